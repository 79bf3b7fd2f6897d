# Tools package: generators, validation and benchmark protocols
