# SYZ mirror symmetry toolkit
