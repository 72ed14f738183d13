"""Services package - Business logic"""
