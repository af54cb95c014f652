def handler(event, context):
    return {"step": "deployment", "input": event}
