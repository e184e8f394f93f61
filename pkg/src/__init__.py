# Worst-class error toolkit
