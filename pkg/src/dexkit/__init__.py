"""dexkit: channel-extension preprocessing and memory planning for tiny CNN accelerators."""

from .accel import (
    MAX78000,
    MAX78002,
    UtilizationReport,
    build_report,
    builtin_profiles,
    check_fit,
    first_layer_params,
    get_profile,
    info_ratio,
    info_utilization,
    load_profile,
    max_channels,
    param_delta,
    processor_utilization,
    strategy_info_ratio,
)
from .baselines import (
    apply_extension,
    coordconv_augment,
    patch_random_extend,
    patch_sequential_extend,
    repetition_extend,
    rotation_extend,
    tile_extend,
)
from .errors import (
    BadMagic,
    ChannelError,
    CorruptFile,
    DexError,
    DtypeError,
    IndexOutOfRange,
    InvalidArgument,
    IoError,
    LengthMismatch,
    ShapeError,
    SpecMismatch,
    UnsupportedFormat,
    ValueOutOfRange,
    VersionMismatch,
)
from .pipeline import (
    IMAGENET_MEAN,
    IMAGENET_STD,
    NormalizationSpec,
    load_image,
    normalize,
    process_dataset,
    quantize_q7,
    read_tensor,
    transform_image,
    write_tensor,
)
from .transform import (
    PatchBounds,
    dex_extend,
    downsample,
    even_sample_offsets,
    patch_bounds,
)
from .types import (
    DeviceProfile,
    Dtype,
    ExtensionConfig,
    ImageTensor,
    LayerSpec,
    Strategy,
    make_tensor,
)

__version__ = "0.1.0"
