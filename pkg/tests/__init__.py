"""
Test suite for the structured DMD toolkit
"""
