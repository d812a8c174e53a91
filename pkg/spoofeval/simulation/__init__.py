"""Physical-access simulation: rooms, replay devices and dataset rendering."""

from spoofeval.simulation.categories import (  # noqa: F401
    CategoryTable,
    PaCategoryLabel,
    category_for_trial,
    enumerate_categories,
    load_category_table,
)
from spoofeval.simulation.dataset import (  # noqa: F401
    RenderedTrial,
    directory_loader,
    generate_dataset,
    grid_protocol,
    render_trial,
    synthetic_source,
    write_dataset,
)
from spoofeval.simulation.device import (  # noqa: F401
    ReplayDeviceSpec,
    apply_replay_device,
)
from spoofeval.simulation.render import (  # noqa: F401
    peak_normalize,
    simulate_bonafide,
    simulate_replay,
    spectral_flatness,
)
from spoofeval.simulation.room import (  # noqa: F401
    RoomSpec,
    rir_image_method,
    schroeder_t60,
)
from spoofeval.simulation.sampling import (  # noqa: F401
    PaConfig,
    SeedSpace,
    sample_config,
    trial_seed,
)
