# Test core module
