#include <math.h>
#include <stdio.h>
#include "sdc.h"

int main(void) {
    SdcParams p;
    if (sdc_params_default(&p) != SDC_STATUS_OK) return 1;
    double c = 0.0;
    if (sdc_capacity("fully-correlated-bell", &p, &c) != SDC_STATUS_OK || fabs(c - 2.0) > 1e-12) return 2;

    SdcState *bell = NULL;
    SdcChannel *ch = NULL;
    if (sdc_state_bell(2, &bell) != SDC_STATUS_OK) return 3;
    if (sdc_channel_depolarising(2, 0.5, &ch) != SDC_STATUS_OK) return 4;
    double chi = 0.0;
    if (sdc_holevo_chi_weyl(bell, ch, 2, &chi) != SDC_STATUS_OK || fabs(chi - 0.1197589) > 1e-6) return 5;
    sdc_state_free(bell);
    sdc_channel_free(ch);

    if (sdc_capacity("missing", &p, &c) != SDC_STATUS_UNKNOWN_CASE) return 6;
    char *msg = sdc_last_error_message();
    if (msg == NULL) return 7;
    printf("%s\n", msg);
    sdc_string_free(msg);
    printf("ok %s\n", sdc_version());
    return 0;
}
