import sys

from dockmock.cli import main

sys.exit(main())
