# Crack solver test suite
