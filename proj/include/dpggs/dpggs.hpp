#ifndef DPGGS_DPGGS_HPP
#define DPGGS_DPGGS_HPP

#include "amr.hpp"
#include "anderson.hpp"
#include "assembly.hpp"
#include "common.hpp"
#include "config.hpp"
#include "dpg_system.hpp"
#include "krylov.hpp"
#include "line_search.hpp"
#include "mesh.hpp"
#include "msh_reader.hpp"
#include "nonlinear.hpp"
#include "preconditioner.hpp"
#include "problems.hpp"
#include "quadrature.hpp"
#include "shapes.hpp"
#include "spaces.hpp"
#include "study.hpp"
#include "vtk.hpp"

#endif // DPGGS_DPGGS_HPP
