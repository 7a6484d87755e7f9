from qwlab.cli import main

raise SystemExit(main())
