"""Local certification of graph embeddability on surfaces."""
