#pragma once

#include "uwbsounder/averager.hpp"
#include "uwbsounder/campaign.hpp"
#include "uwbsounder/capture.hpp"
#include "uwbsounder/channel.hpp"
#include "uwbsounder/config_io.hpp"
#include "uwbsounder/dft.hpp"
#include "uwbsounder/errors.hpp"
#include "uwbsounder/estimator.hpp"
#include "uwbsounder/export.hpp"
#include "uwbsounder/fixedpoint.hpp"
#include "uwbsounder/sounder_config.hpp"
#include "uwbsounder/sync.hpp"
#include "uwbsounder/waveform.hpp"
