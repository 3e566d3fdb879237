# Convenience entry point; the installed script is `greenseq`
from src.greenseq.cli import main

if __name__ == "__main__":
    main()
