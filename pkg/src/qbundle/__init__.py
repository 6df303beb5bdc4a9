"""Locally trivial quantum U(1)-bundle over the glued quantum sphere."""
