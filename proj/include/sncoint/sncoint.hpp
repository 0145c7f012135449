#pragma once

#include "sncoint/core/timeseries.hpp"
#include "sncoint/lrv/kernels.hpp"
#include "sncoint/estimators/ols.hpp"
#include "sncoint/estimators/restriction.hpp"
#include "sncoint/estimators/im_ols.hpp"
#include "sncoint/estimators/fm_ols.hpp"
#include "sncoint/estimators/d_ols.hpp"
#include "sncoint/inference/selfnorm.hpp"
#include "sncoint/bootstrap/var_sieve.hpp"
#include "sncoint/bootstrap/bootstrap.hpp"
#include "sncoint/asymptotics/critical_value_table.hpp"
#include "sncoint/asymptotics/critical_values.hpp"
#include "sncoint/montecarlo/dgp.hpp"
#include "sncoint/montecarlo/experiment.hpp"
#include "sncoint/io/csv.hpp"
#include "sncoint/io/config.hpp"
#include "sncoint/io/report.hpp"
