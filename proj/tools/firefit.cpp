#include "firefit/app.hpp"

int main(int argc, char** argv) { return firefit::app::run(argc, argv); }
