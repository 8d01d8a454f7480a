# Test package for wbplanner
