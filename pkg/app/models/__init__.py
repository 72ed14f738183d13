"""Pydantic models package"""
