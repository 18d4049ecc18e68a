from kreinlab.cli import main

main()
