# Catalog loop constructions
