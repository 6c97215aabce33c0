# Timing benchmarks for the checker pipeline
