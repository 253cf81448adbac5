import sys

from memsbpf.cli import main

sys.exit(main())
