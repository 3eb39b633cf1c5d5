# Test suite for renewal_lab
# Unit, property-based, end-to-end and acceptance-scale tests.
