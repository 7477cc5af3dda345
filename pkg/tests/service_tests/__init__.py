# Service unit tests
