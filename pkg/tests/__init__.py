"""
Test suite for the only-believing model checker
"""
