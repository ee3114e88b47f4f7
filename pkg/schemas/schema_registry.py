"""
Schema Registry for QBZZB inputs and artifacts

Provides JSON Schema validation for prior, spectrum and OU process input
files and for the bound and verification reports written by the CLI.
"""

import json
from pathlib import Path
from typing import Dict, Any, List, Optional
from jsonschema import ValidationError, Draft7Validator
from jsonschema.exceptions import best_match
from referencing import Registry, Resource


class SchemaRegistry:
    """Central registry for JSON schemas with validation utilities."""

    SCHEMA_FILES = {
        'prior': 'prior_v1.json',
        'spectrum': 'spectrum_v1.json',
        'ou_process': 'ou_process_v1.json',
        'provenance': 'provenance_v1.json',
        'bound_report': 'bound_report_v1.json',
        'verify_report': 'verify_report_v1.json',
    }

    def __init__(self, schema_dir: Optional[Path] = None):
        """
        Initialize the schema registry.

        Args:
            schema_dir: Directory containing schema files. If None, uses default location.
        """
        if schema_dir is None:
            self.schema_dir = Path(__file__).parent
        else:
            self.schema_dir = Path(schema_dir)

        self._schemas: Dict[str, Dict[str, Any]] = {}
        self._load_schemas()
        # Report schemas reference provenance_v1.json by $id
        self._resolver = Registry().with_resources(
            (schema['$id'], Resource.from_contents(schema))
            for schema in self._schemas.values() if '$id' in schema
        )

    def _load_schemas(self):
        """Load all schema files from the schema directory."""
        for schema_name, filename in self.SCHEMA_FILES.items():
            schema_path = self.schema_dir / filename
            if schema_path.exists():
                with open(schema_path, 'r') as f:
                    self._schemas[schema_name] = json.load(f)
            else:
                print(f"Warning: Schema file not found: {schema_path}")

    def get_schema(self, schema_name: str) -> Dict[str, Any]:
        """
        Get a schema by name.

        Raises:
            KeyError: If schema not found
        """
        if schema_name not in self._schemas:
            raise KeyError(f"Schema '{schema_name}' not found. Available: {list(self._schemas.keys())}")
        return self._schemas[schema_name]

    def get_validator(self, schema_name: str) -> Draft7Validator:
        """Get a Draft7Validator for a schema, with cross-schema references resolved."""
        return Draft7Validator(self.get_schema(schema_name), registry=self._resolver)

    def validate(self, data: Any, schema_name: str, raise_error: bool = True) -> bool:
        """
        Validate data against a schema.

        Args:
            data: Data to validate
            schema_name: Name of the schema to validate against
            raise_error: If True, raises ValidationError on failure. If False, returns False.

        Returns:
            True if validation passes, False if it fails (when raise_error=False)

        Raises:
            ValidationError: If validation fails and raise_error=True
            KeyError: If schema not found
        """
        validator = self.get_validator(schema_name)
        error = best_match(validator.iter_errors(data))
        if error is None:
            return True
        if raise_error:
            path = ' -> '.join(str(p) for p in error.path) or '<root>'
            raise ValidationError(
                f"Validation failed for schema '{schema_name}': {error.message}\n"
                f"Path: {path}",
                path=error.path,
            )
        return False

    def list_schemas(self) -> List[str]:
        return list(self._schemas.keys())


# Global schema registry instance
_registry: Optional[SchemaRegistry] = None


def get_registry() -> SchemaRegistry:
    """
    Get the global schema registry instance (singleton pattern).

    Returns:
        The global SchemaRegistry instance
    """
    global _registry
    if _registry is None:
        _registry = SchemaRegistry()
    return _registry


def validate_data(data: Any, schema_name: str, raise_error: bool = True) -> bool:
    """Convenience function to validate data using the global registry."""
    return get_registry().validate(data, schema_name, raise_error)


if __name__ == "__main__":
    registry = SchemaRegistry()
    print("Available schemas:", registry.list_schemas())

    sample_prior = {"mean": [0.0, 0.0], "sigma0": [[2.0, 1.0], [1.0, 2.0]]}
    try:
        registry.validate(sample_prior, 'prior')
        print("✓ Sample prior is valid")
    except ValidationError as e:
        print(f"✗ Validation failed: {e}")
