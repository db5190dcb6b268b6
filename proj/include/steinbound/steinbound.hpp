#pragma once

#include "steinbound/bounds.hpp"
#include "steinbound/compensated_sum.hpp"
#include "steinbound/distributions.hpp"
#include "steinbound/error.hpp"
#include "steinbound/harness.hpp"
#include "steinbound/oracle.hpp"
#include "steinbound/pmf.hpp"
#include "steinbound/stein.hpp"
#include "steinbound/sum_specs.hpp"
#include "steinbound/weighted_sum.hpp"
