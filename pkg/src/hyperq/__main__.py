from hyperq.cli import main

raise SystemExit(main())
