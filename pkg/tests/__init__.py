# Tests package for attachlab
