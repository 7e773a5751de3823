# Assets package for the coveragekit CLI
