#pragma once

#include "simpcert/certificate.hpp"
#include "simpcert/config.hpp"
#include "simpcert/errors.hpp"
#include "simpcert/expr.hpp"
#include "simpcert/interval.hpp"
#include "simpcert/jet.hpp"
#include "simpcert/polynomial.hpp"
#include "simpcert/proof_trace.hpp"
#include "simpcert/quadrature.hpp"
#include "simpcert/rational.hpp"
#include "simpcert/rootscan.hpp"
