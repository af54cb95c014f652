def handler(event, context):
    return {"step": "feature_engineering", "input": event}
