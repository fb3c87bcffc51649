1
