#ifndef PFT_CONFIG_HPP
#define PFT_CONFIG_HPP

#include <string>

#include "pft/tracker.hpp"

namespace pft {

// Applies key=value overrides ('#' comments allowed) onto a TrackerConfig.
// Unknown keys raise ParseError.  Recognized keys include n_cnt, n_in,
// roi_margin, variance_cutoff, histogram_bins, learn_rate_f, learn_rate_b,
// use_interior, min_valid_contours, fan.a_int_deg, flow.*, schedule.b2,
// schedule.lambda_r, schedule.lambda_t, schedule.gn_iters_per_search and
// schedule.stage<0..3>.{a_reg_deg,l_src,sigma,gamma,lambda,search_iters}.
void apply_config_text(TrackerConfig& config, const std::string& text,
                       const std::string& source_name = "<config>");
void apply_config_file(TrackerConfig& config, const std::string& path);

}  // namespace pft

#endif  // PFT_CONFIG_HPP
