#ifndef FAIRPIPE_FAIRPIPE_HPP
#define FAIRPIPE_FAIRPIPE_HPP

#include "fairpipe/composition.hpp"
#include "fairpipe/distribution.hpp"
#include "fairpipe/errors.hpp"
#include "fairpipe/feedback.hpp"
#include "fairpipe/groups.hpp"
#include "fairpipe/hiring.hpp"
#include "fairpipe/io.hpp"
#include "fairpipe/metrics.hpp"
#include "fairpipe/pipeline.hpp"
#include "fairpipe/rational.hpp"
#include "fairpipe/rng.hpp"

#endif  // FAIRPIPE_FAIRPIPE_HPP
