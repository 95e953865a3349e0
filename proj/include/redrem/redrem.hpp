#pragma once

#include "redrem/bench_io.hpp"
#include "redrem/circuit.hpp"
#include "redrem/gate.hpp"
#include "redrem/implication.hpp"
#include "redrem/oracle.hpp"
#include "redrem/random_circuit.hpp"
#include "redrem/remover.hpp"
#include "redrem/report.hpp"
#include "redrem/topo_index.hpp"
#include "redrem/unobservability.hpp"
