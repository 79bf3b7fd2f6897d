# Core package: WFST data model and composition engines
