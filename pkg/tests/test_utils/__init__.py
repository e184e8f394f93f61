# Test utils module
