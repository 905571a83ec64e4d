#ifndef IACD_IACD_HPP
#define IACD_IACD_HPP

#include "iacd/canonical.hpp"
#include "iacd/classifiers.hpp"
#include "iacd/errors.hpp"
#include "iacd/featsel.hpp"
#include "iacd/packet.hpp"
#include "iacd/pcap.hpp"
#include "iacd/preprocess.hpp"
#include "iacd/scenario.hpp"
#include "iacd/signature.hpp"
#include "iacd/sim.hpp"
#include "iacd/stats.hpp"
#include "iacd/svm.hpp"

#endif  // IACD_IACD_HPP
