"""Test suite for Beatlength."""
