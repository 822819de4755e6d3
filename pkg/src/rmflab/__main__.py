from rmflab.cli import main

main()
