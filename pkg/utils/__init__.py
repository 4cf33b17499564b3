"""CSV and run-manifest export"""
