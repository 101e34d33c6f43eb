# Subordination Toolkit - differential subordination conditions and their numerical verification
