#pragma once

namespace chasym {

// Default numerical thresholds. Every operation that makes a yes/no numerical
// decision takes one of these; scaled() multiplies all of them at once.
struct Tolerances {
  double tp = 1e-10;     // trace preservation of Kraus lists
  double eig = 1e-9;     // eigen-residual relative to ||M||_F
  double group = 1e-7;   // eigenvalue clustering
  double match = 1e-7;   // left/right eigenvalue matching
  double sing = 1e-10;   // smallest singular value for restricted inverses
  double rank = 1e-9;    // relative rank cutoff (fixed points, Choi spectra)
  double per = 1e-7;     // |mu| >= 1 - per counts as peripheral
  double rat = 1e-7;     // rational phase recognition
  double proj = 1e-8;    // idempotence / projection identities
  double probe = 1e-8;   // eigenvalue gap for random algebra probes
  double shape = 1e-7;   // blocks-of-factors reconstruction

  Tolerances scaled(double factor) const {
    Tolerances t = *this;
    for (double* v : {&t.tp, &t.eig, &t.group, &t.match, &t.sing, &t.rank,
                      &t.per, &t.rat, &t.proj, &t.probe, &t.shape})
      *v *= factor;
    return t;
  }
};

}  // namespace chasym
