# Integration and unit tests for the QBZZB library and CLI
