from rellab.cli import main

main()
