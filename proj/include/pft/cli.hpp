#ifndef PFT_CLI_HPP
#define PFT_CLI_HPP

namespace pft {

// Entry point for the pft command-line tool (gen-templates, synth, track,
// eval, bench).  Returns 0 on success, 1 on tracking loss without a reset
// policy, 2 on I/O or argument errors.
int cli_main(int argc, const char* const* argv);

}  // namespace pft

#endif  // PFT_CLI_HPP
