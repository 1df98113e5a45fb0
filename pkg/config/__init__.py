# -*- coding: utf-8 -*-
"""全局配置：数值容差、尺度网格、判据参数、并发与日志"""
import math
import os

# 项目根目录（config 包所在目录的上一级）
_ROOT_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

# 数值容差
PLANE_EQUAL_TOL = 1e-10        # 正交基检查、平面相等（Grassmann 距离低于此视为同一平面）
MEMBERSHIP_SLACK = 1e-12       # 区域判定时右端加上的浮点余量
PYTHAGORAS_TOL = 1e-9          # Elem 引理里 a²+b²=w² 的容差
THETA_FLOOR = 1e-12            # 平面转角低于此视为 0（Hölder 拟合时剔除）
DENSITY_FLOOR = 1e-9           # 下密度估计需高于此才算 Θ_* > 0
BETA_FLOOR = 1e-12             # β 值低于此视为 0（斜率拟合、作图时当空缺）
GROWTH_ABS_FLOOR = 1e-14       # 增长引理两侧都接近 0 时的绝对余量

# 尺度网格 r_j = r0 * rho^j, j = 0..J
GRID_R0 = 0.5
GRID_RHO = 0.5
GRID_J = 8
RESOLUTION_FLOOR_FACTOR = 4.0  # 最小尺度不得低于 最小点距 * 此因子，否则该尺度无效

# 判据默认参数
CRITERION_ALPHA = 0.5
CRITERION_LAMBDA = 4.0
CRITERION_DELTA = 0.5
CRITERION_M = 8.0
CRITERION_M_TAIL = 5            # limsup 以最细的 m_tail 个有效尺度上的 max 代替
CRITERION_P_LIST = (2.0, math.inf)
CONE_APERTURE = 1.0
UNIFORM_EPS_SCALE = 0.99        # 均匀子集的 ε 取 δ/(4^k+1) 再乘以此系数
JONES_SLOPE_MIN = 0.1           # log β_2 对 log r 斜率高于此视为 Jones 和有限
GHINASSI_SLOPE_MARGIN = 0.05    # β_∞ 斜率需超过 α + 此余量
BETA_BOUND_SHRINK = 4.0         # beta_bound：半径 < 此倍数 × 最细有效半径 的尺度算"细"
BETA_BOUND_GROWTH = 2.0         # 细尺度上 r^{−α}β_p 的最大值不到粗尺度最大值的此倍数即算有界

# β_p 拟合
BETA_P_MAX_ITER = 60
BETA_P_RESTARTS = 4             # 除 β_2 种子平面外的随机旋转起点个数
BETA_P_REL_TOL = 1e-10
BETA_INF_QUANTILE = 0.0         # esssup 时丢弃的最轻权重分位（0=普通加权最大值）

# 查询点与并发
QUERY_STRIDE = 10               # 每隔 stride 个点取一个查询点
WORKER_THREADS = 1              # 1=当前线程顺序执行
GLOBAL_SEED = 20240601
FIT_CACHE_MAX_SIZE = 4096

# Whitney / 几何引理
WHITNEY_PAIR_CAP = 20000        # 点数超过此值时确定性抽稀
WHITNEY_CHUNK = 512             # 成对计算的分块大小
GRAPH_TILT_MAX = 0.25           # 平面与基平面的 Grassmann 距离上限

# 验证套件
VERIFY_SAMPLES = 10000
VERIFY_PLANE_PAIRS = 50
VERIFY_FUBINI_TOL = 0.05        # 梯形积分与二进和比较时的离散容差
VERIFY_SABOTAGE_FACTOR = 1.5
VERIFY_DIST_SAMPLES = 100000    # Grassmann 距离上确界的蒙特卡洛样本数
VERIFY_CLOUD_DRAWS = 100        # 在生成点云上抽取的 (x, r) 组数

# 日志与指标
LOG_DIR = os.path.join(_ROOT_DIR, "logs")
LOG_FILE_NAME = "rectiscope.log"
LOG_TO_FILE = True
LOG_LEVEL = "INFO"              # DEBUG / INFO / WARNING / ERROR；RESULT 与 METRICS 始终输出
LOG_ROTATING_MAX_BYTES = 5 * 1024 * 1024  # 5MB 滚动
LOG_BACKUP_COUNT = 3
LOG_VERDICTS = True             # 每个查询点打一行判定结果
METRICS_LOG_INTERVAL_SEC = 30   # 每 N 秒打一条指标（已完成点数、平均耗时、剩余）
