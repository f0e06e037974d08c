#ifndef SMOKEKIT_SMOKEKIT_HPP
#define SMOKEKIT_SMOKEKIT_HPP

#include "smokekit/color.hpp"
#include "smokekit/dark_channel.hpp"
#include "smokekit/dehaze.hpp"
#include "smokekit/error.hpp"
#include "smokekit/eval_json.hpp"
#include "smokekit/fixtures.hpp"
#include "smokekit/guided_filter.hpp"
#include "smokekit/harmonize.hpp"
#include "smokekit/image.hpp"
#include "smokekit/io.hpp"
#include "smokekit/metrics.hpp"
#include "smokekit/parallel.hpp"
#include "smokekit/scatter.hpp"
#include "smokekit/score.hpp"

#endif // SMOKEKIT_SMOKEKIT_HPP
