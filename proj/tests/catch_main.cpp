// Amalgamated Catch2 implementation with its default main.
#include <catch2/catch_amalgamated.cpp>
