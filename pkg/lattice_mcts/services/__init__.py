"""Service layer: trial execution, experiment presets and output files."""
