# Test package for spoofeval
