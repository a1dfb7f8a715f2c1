from membooth.cli import main

raise SystemExit(main())
