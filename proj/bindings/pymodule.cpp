#include <pybind11/pybind11.h>
PYBIND11_MODULE(homforge_py, m) { m.doc() = "placeholder"; }
