"""
Pydantic schemas for states, channels, purity orders, optimization results,
analysis reports, run configuration and the command response envelope.

Import from the submodules directly; app.numerics.linalg depends on
app.schemas.spectrum, and app.schemas.channel depends on linalg.
"""
