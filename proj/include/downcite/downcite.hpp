#pragma once

// Umbrella header: the whole toolkit in dependency order.

#include "downcite/calendar.hpp"
#include "downcite/records.hpp"
#include "downcite/stats.hpp"
#include "downcite/rng.hpp"
#include "downcite/csv.hpp"
#include "downcite/schemas.hpp"
#include "downcite/ingest.hpp"
#include "downcite/profiles.hpp"
#include "downcite/classify.hpp"
#include "downcite/model.hpp"
#include "downcite/correlate.hpp"
#include "downcite/synth.hpp"
#include "downcite/report.hpp"
#include "downcite/artifacts.hpp"
