#pragma once

#include "tdacpd/bartlett.hpp"
#include "tdacpd/benchmark.hpp"
#include "tdacpd/cvm.hpp"
#include "tdacpd/detection.hpp"
#include "tdacpd/embedding.hpp"
#include "tdacpd/energy.hpp"
#include "tdacpd/error.hpp"
#include "tdacpd/io/csv.hpp"
#include "tdacpd/io/json.hpp"
#include "tdacpd/monte_carlo.hpp"
#include "tdacpd/pipeline.hpp"
#include "tdacpd/prewhiten.hpp"
#include "tdacpd/random.hpp"
#include "tdacpd/series.hpp"
#include "tdacpd/simulate.hpp"
#include "tdacpd/topology.hpp"
#include "tdacpd/union_find.hpp"

namespace tdacpd {

inline constexpr const char* kVersion = "0.1.0";

} // namespace tdacpd
